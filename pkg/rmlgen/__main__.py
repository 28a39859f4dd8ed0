from rmlgen.cli import main

main()
