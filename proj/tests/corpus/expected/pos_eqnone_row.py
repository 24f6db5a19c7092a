def first_valid(rows):
    for row in rows:
        if row is None:
            continue
        return row
    return None
