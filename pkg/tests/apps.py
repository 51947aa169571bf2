from django.apps import AppConfig


class SchwartzDynamicsTestsAppConfig(AppConfig):
    name = 'tests'
