def blank(values):
    if len(values) == 0:
        return True
    return False
