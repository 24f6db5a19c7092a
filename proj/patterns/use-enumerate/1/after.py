def walk():
    data = [1, 2]
    for i, item in enumerate(data):
        item
