def collect(value, acc=None):
    if acc is None:
        acc = []
    acc.append(value)
    return acc
