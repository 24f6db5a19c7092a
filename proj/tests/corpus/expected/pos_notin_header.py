def needs_header(line, headers):
    if line not in headers:
        return True
    return False
