def scan():
    entries = []
    for idx in range(len(entries)):
        entries[idx]
