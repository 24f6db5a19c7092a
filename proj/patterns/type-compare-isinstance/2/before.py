def verify(item):
    if type(item) == list:
        return True
    return False
