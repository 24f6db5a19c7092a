def pick(value):
    if type(value) == dict:
        return True
    return False
