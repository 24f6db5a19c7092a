def weight_total(weights):
    total = sum(weights)
    return total
