def add_all(numbers):
    acc = sum(numbers)
    return acc
