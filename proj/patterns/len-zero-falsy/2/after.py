def blank(values):
    if not values:
        return True
    return False
