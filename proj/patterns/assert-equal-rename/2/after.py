def test_name(self):
    self.assertEqual(label, wanted)
