from django.apps import AppConfig


class ShapingConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "shaping"
