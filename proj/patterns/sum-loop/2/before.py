def add_all(numbers):
    acc = 0
    for n in numbers:
        acc += n
    return acc
