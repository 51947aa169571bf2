from django.apps import AppConfig


class SchwartzDynamicsAppConfig(AppConfig):
    name = 'schwartz_dynamics'
    verbose_name = "Schwartz dynamics"
