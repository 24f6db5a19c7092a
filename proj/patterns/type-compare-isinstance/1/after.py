def pick(value):
    if isinstance(value, dict):
        return True
    return False
