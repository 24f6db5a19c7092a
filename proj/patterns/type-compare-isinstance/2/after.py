def verify(item):
    if isinstance(item, list):
        return True
    return False
