def test_name(self):
    self.assertEquals(label, wanted)
