def collect(value, acc=[]):
    acc.append(value)
    return acc
