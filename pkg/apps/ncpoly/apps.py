from django.apps import AppConfig


class NcpolyConfig(AppConfig):
    name = "apps.ncpoly"
    label = "ncpoly"
    verbose_name = "Noncommutative SOS"
