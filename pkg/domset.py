"""Command-line entry: python domset.py <gen|solve|decide|hunt|approx|experiment> ..."""
from rgdom.cli import main

if __name__ == '__main__':
    main()
