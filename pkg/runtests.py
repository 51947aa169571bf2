#!/usr/bin/env python
"""./runtests.py [test labels] [options for Django's test command], against tests.settings"""
import os
import sys

from django.core.management import execute_from_command_line


def main(argv):
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tests.settings')
    execute_from_command_line([argv[0], 'test'] + (argv[1:] or ['tests']))


if __name__ == '__main__':
    main(sys.argv)
