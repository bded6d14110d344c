from django.apps import AppConfig


class NpaConfig(AppConfig):
    name = "apps.npa"
    label = "npa"
    verbose_name = "NPA Hierarchy"
