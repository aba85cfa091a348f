import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "kdvdet.settings")
django.setup()
