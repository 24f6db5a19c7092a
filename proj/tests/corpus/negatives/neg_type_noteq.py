def not_dict(a):
    if type(a) != dict:
        return True
    return False
