# accepts exactly the pictures of even width
state a
state b
tile B B B ./a
tile B ./a B ./a
tile B ./a B B
tile B B ./a ./b
tile ./a ./b ./a ./b
tile ./a ./b B B
tile B B ./b ./a
tile ./b ./a ./b ./a
tile ./b ./a B B
tile B B ./b B
tile ./b B ./b B
tile ./b B B B
