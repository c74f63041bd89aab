from django.apps import AppConfig


class TilingsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'tilings'
    verbose_name = 'Motor de tilings'
