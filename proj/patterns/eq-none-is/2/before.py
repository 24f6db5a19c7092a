def guard(value):
    if value == None:
        return True
    return False
