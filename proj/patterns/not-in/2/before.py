def absent(item, bag):
    if not item in bag:
        return True
    return False
