def single(xs):
    if len(xs) == 1:
        return xs[0]
    return None
