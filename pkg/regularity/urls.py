from django.urls import path
from .views import CheckRegularView, CompletePairView, HallView, StarTileView, SuperregularizeView

urlpatterns = [
    path("check/", CheckRegularView.as_view(), name="check-regular"),
    path("superregularize/", SuperregularizeView.as_view(), name="superregularize"),
    path("hall/", HallView.as_view(), name="hall"),
    path("stars/", StarTileView.as_view(), name="star-tile"),
    path("complete-pair/", CompletePairView.as_view(), name="complete-pair"),
]
