"""Test suite for django-upb."""
