def guard(value):
    if value is None:
        return True
    return False
