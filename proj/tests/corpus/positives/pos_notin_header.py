def needs_header(line, headers):
    if not line in headers:
        return True
    return False
