def test_sum(self):
    self.assertEqual(total, expected)
