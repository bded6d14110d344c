from django.apps import AppConfig


class ClassicalConfig(AppConfig):
    name = "apps.classical"
    label = "classical"
    verbose_name = "Classical Solver"
