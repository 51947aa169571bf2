from django.urls import path

from schwartz_dynamics import views

urlpatterns = [
    path('classify/', views.classify_symbol, name='schwartz_dynamics_classify'),
    path('point-spectrum/', views.point_spectrum, name='schwartz_dynamics_point_spectrum'),
]
