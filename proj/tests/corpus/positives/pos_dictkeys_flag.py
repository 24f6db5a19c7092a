def mark_seen(code, registry):
    found = code in registry.keys()
    return found
