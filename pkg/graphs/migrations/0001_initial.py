# Generated by Django 5.2.7 on 2026-10-17 10:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='GraphRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(blank=True, max_length=255)),
                ('n', models.PositiveIntegerField()),
                ('edge_count', models.PositiveIntegerField(default=0)),
                ('graph6', models.TextField()),
                ('source', models.CharField(choices=[('UPLOAD', 'Upload'), ('GNP', 'G(n,p)'), ('PERTURBED', 'Perturbed'), ('EXTREMAL', 'Extremal base'), ('MINDEG', 'Min-degree base')], default='UPLOAD', max_length=20)),
                ('seed', models.CharField(blank=True, max_length=32)),
                ('parameters', models.JSONField(blank=True, default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
