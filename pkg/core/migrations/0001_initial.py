# Generated by Django 5.1.1

import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=20)),
                ('task', models.CharField(blank=True, max_length=20)),
                ('method', models.CharField(blank=True, max_length=10)),
                ('seed', models.IntegerField(default=0)),
                ('status', models.CharField(choices=[('ok', 'OK'), ('config_error', 'Erro de configuração'), ('failed', 'Falhou')], default='ok', max_length=12)),
                ('summary', models.JSONField(blank=True, default=dict)),
                ('config_digest', models.CharField(blank=True, max_length=16)),
                ('run_id', models.CharField(blank=True, db_index=True, max_length=32)),
                ('created_at', models.DateTimeField(default=django.utils.timezone.now)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
                'indexes': [models.Index(fields=['task', 'method', 'seed'], name='core_runrec_task_5b8e1c_idx')],
            },
        ),
    ]
