# optimizer package
