from django.urls import include, path

from schwartz_dynamics import urls as schwartz_dynamics_urls

urlpatterns = [
    path('schwartz/', include(schwartz_dynamics_urls)),
]
