def test_totals(self):
    self.assertEqual(calc, goal)
