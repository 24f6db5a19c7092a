def total_of(values):
    total = sum(values)
    return total
