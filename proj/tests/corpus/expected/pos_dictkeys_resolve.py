def resolve(alias, mapping):
    if alias in mapping:
        return mapping[alias]
    return alias
