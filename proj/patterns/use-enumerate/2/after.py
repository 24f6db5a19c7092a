def scan():
    entries = []
    for idx, item in enumerate(entries):
        item
