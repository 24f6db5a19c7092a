def resolve(alias, mapping):
    if alias in mapping.keys():
        return mapping[alias]
    return alias
