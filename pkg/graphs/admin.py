from django.contrib import admin
from .models import GraphRecord

@admin.register(GraphRecord)
class GraphRecordAdmin(admin.ModelAdmin):
    list_display = ("id", "name", "n", "edge_count", "source", "created_at")
    search_fields = ("name", "graph6")
    list_filter = ("source",)
