import os

import django


def pytest_configure(config):
    # mirror what Django's test runner (runtests.py) does before running tests
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tests.settings')
    django.setup()
    from django.test.utils import setup_test_environment
    setup_test_environment()
