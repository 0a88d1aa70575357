from cqes.cli import main

main()
