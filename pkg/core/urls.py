from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path('admin/', admin.site.urls),

    # Apps
    path('api/graphs/', include('graphs.urls')),
    path('api/densities/', include('densities.urls')),
    path('api/tilings/', include('tilings.urls')),
    path('api/regularity/', include('regularity.urls')),
    path('api/experiments/', include('experiments.urls')),
]
