def test_sum(self):
    self.assertEquals(total, expected)
