"""
Standalone entry point for the `schwartz` management command, for use outside a Django
project: `schwartz-dynamics classify 'x^2+1' --json`.
"""
import sys

import django
from django.conf import settings
from django.core.management.base import CommandError


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {'format': '%(levelname)s %(name)s: %(message)s'},
    },
    'handlers': {
        'stderr': {'class': 'logging.StreamHandler', 'stream': 'ext://sys.stderr', 'formatter': 'plain'},
    },
    'loggers': {
        'schwartz_dynamics': {'handlers': ['stderr'], 'level': 'WARNING', 'propagate': False},
    },
}


def configure():
    if not settings.configured:
        settings.configure(
            INSTALLED_APPS=['schwartz_dynamics'],
            LOGGING=LOGGING,
            USE_TZ=True,
        )
        django.setup()


def run(argv=None):
    """Run the command with `argv` (without the program name) and return its exit status"""
    configure()
    from schwartz_dynamics.management.commands.schwartz import Command

    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        Command().run_from_argv(['schwartz-dynamics', 'schwartz'] + argv)
    except CommandError as e:
        # usage errors raised by subcommand parsers
        sys.stderr.write(f"{e}\n")
        return e.returncode if e.returncode != 1 else 2
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    return 0


def main():
    sys.exit(run())
