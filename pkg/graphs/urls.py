from django.urls import path, include
from rest_framework.routers import DefaultRouter
from .views import GraphRecordViewSet

router = DefaultRouter()
router.register(r"", GraphRecordViewSet, basename="graph")

urlpatterns = [
    path("", include(router.urls)),
]
