from django.urls import path
from .views import TileView

urlpatterns = [
    path("tile/", TileView.as_view(), name="tile"),
]
