from django.urls import path, include
from rest_framework.routers import DefaultRouter
from .views import SweepRunViewSet

router = DefaultRouter()
router.register(r"runs", SweepRunViewSet, basename="run")

urlpatterns = [
    path("", include(router.urls)),
]
