def test_labels(self):
    made = build()
    self.assertEqual(made, wanted)
