def contains(name, vocab):
    return name in vocab.keys()
