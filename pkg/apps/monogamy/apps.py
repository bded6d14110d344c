from django.apps import AppConfig


class MonogamyConfig(AppConfig):
    name = "apps.monogamy"
    label = "monogamy"
    verbose_name = "Monogamy Reports"
